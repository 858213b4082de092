#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "sparsecut/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const sparsecut::RunConfig config = sparsecut::parse_config(args);
    return sparsecut::run(config);
  } catch (const sparsecut::CliExit& e) {
    return e.code();
  } catch (const sparsecut::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
