#include "plapmem/cli.hpp"

int main(int argc, char** argv) {
  return plapmem::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
