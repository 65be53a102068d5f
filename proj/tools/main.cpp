#include "cli_app.hpp"

int main(int argc, char** argv) { return cgp::tools::run_cli(argc, argv); }
