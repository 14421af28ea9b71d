#include "frenetlab/cli.hpp"

int main(int argc, char** argv) {
  frenetlab::cli::RunConfig config;
  if (auto code = frenetlab::cli::parse_command_line(argc, argv, config)) return *code;
  return frenetlab::cli::run(config);
}
