#include "mbuniq_cli.hpp"

int main(int argc, char** argv) { return mbuniq::cli::cli_dispatch(argc, argv); }
