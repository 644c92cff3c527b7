#include "ksim/cli.hpp"

int main(int argc, char** argv) { return ksim::run_cli(argc, argv); }
