#include "commands.hpp"

int main(int argc, char** argv) { return gtvseg::cli::run(argc, argv); }
