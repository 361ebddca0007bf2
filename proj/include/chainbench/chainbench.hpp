#pragma once

#include "chainbench/chaining.hpp"
#include "chainbench/cli.hpp"
#include "chainbench/client.hpp"
#include "chainbench/combinatorics.hpp"
#include "chainbench/corpus.hpp"
#include "chainbench/extraction.hpp"
#include "chainbench/grading.hpp"
#include "chainbench/number.hpp"
#include "chainbench/numscan.hpp"
#include "chainbench/oracle.hpp"
#include "chainbench/prompts.hpp"
#include "chainbench/rng.hpp"
#include "chainbench/suite_io.hpp"
#include "chainbench/version.hpp"
