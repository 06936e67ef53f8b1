#include "powerhp/cli/cli.hpp"

int main(int argc, char** argv) { return powerhp::cli::parse_and_dispatch(argc, argv); }
