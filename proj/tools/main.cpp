#include "cslrot/cli.hpp"

int main(int argc, char** argv) { return cslrot::run(argc, argv); }
