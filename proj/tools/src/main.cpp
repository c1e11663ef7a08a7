#include <string>
#include <vector>

#include "explainkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return explainkit::cli::run(args);
}
