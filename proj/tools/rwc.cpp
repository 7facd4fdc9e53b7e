#include "rwc/cli.hpp"

int main(int argc, char** argv) { return rwc::cli::run(argc, argv); }
