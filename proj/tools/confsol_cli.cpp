#include "confsol/report/cli.hpp"

int main(int argc, char** argv) { return confsol::report::run_cli(argc, argv); }
