#include <wigner/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return wigner::cli::run_cli(argc, argv, std::cout, std::cerr); }
