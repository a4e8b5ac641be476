#include "exrw/cli.hpp"

int main(int argc, char** argv) { return exrw::cli::run(argc, argv); }
