#include "aim/cli.hpp"

int main(int argc, char** argv) {
  return aim::cli_main(argc, const_cast<const char* const*>(argv));
}
