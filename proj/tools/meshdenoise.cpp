#include "meshdenoise/cli.hpp"

int main(int argc, char** argv) { return mdn::cli::cli_main(argc, argv); }
