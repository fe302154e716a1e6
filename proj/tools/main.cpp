#include "omniport/cli.hpp"

int main(int argc, char** argv) { return omniport::cli::run(argc, argv); }
