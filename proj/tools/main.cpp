#include "erfmin/cli_io.hpp"

int main(int argc, char** argv) { return erfmin::run_cli(argc, argv); }
