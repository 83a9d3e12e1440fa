#pragma once

#include "sssv/analysis.hpp"
#include "sssv/engines.hpp"
#include "sssv/errors.hpp"
#include "sssv/ising.hpp"
#include "sssv/problem_io.hpp"
#include "sssv/runner.hpp"
#include "sssv/schedule.hpp"
#include "sssv/version.hpp"
