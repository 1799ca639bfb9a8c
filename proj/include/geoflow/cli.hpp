#pragma once

#include "geoflow/error.hpp"

namespace geoflow {

/// Entry point of the geoflow command-line tool. Returns the process exit
/// code: 0 ok, 2 config/input error, 3 data error, 4 resource limit.
int run_cli(int argc, char** argv);

int exit_code_for(const Error& error);

}  // namespace geoflow
