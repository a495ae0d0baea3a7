#include "cli.hpp"

int main(int argc, char** argv) { return hybridbvp::cli::run(argc, argv); }
