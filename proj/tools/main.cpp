#include "relaysim/cli.hpp"

int main(int argc, char** argv) {
  return relaysim::run_command({argv + 1, argv + argc});
}
