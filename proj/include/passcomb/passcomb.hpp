#pragma once

// Umbrella header for the library (the CLI lives in passcomb/cli.hpp).

#include "passcomb/dataset.hpp"
#include "passcomb/engine.hpp"
#include "passcomb/oracle.hpp"
#include "passcomb/report.hpp"
#include "passcomb/strategies.hpp"
#include "passcomb/trie.hpp"
#include "passcomb/types.hpp"
