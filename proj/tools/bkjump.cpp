#include "bkjump/cli.hpp"

int main(int argc, char** argv) { return bkj::run_cli(argc, argv); }
