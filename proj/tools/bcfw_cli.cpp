#include <string>
#include <vector>

#include "bcfw/cli/run.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return bcfw::cli::run(args);
}
