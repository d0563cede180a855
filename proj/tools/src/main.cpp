#include "commands.hpp"

int main(int argc, char** argv) { return sketch::cli::run(argc, argv); }
