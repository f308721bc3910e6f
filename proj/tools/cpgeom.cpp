#include <cpgeom/cli.hpp>

int main(int argc, char** argv) { return cpgeom::run(argc, argv); }
