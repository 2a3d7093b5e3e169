#include "cli.hpp"

int main(int argc, char** argv) { return conequant::cli::run(argc, argv); }
