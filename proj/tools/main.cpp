#include "stkde/cli.hpp"

int main(int argc, char** argv) {
  return stkde::cli_run({argv + 1, argv + argc});
}
