#include <iostream>

#include <bubble_lab/cli.hpp>

int main(int argc, char** argv) { return bubble_lab::cli::cli_dispatch(argc, argv, std::cout, std::cerr); }
