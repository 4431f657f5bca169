#pragma once

#include "netreduce/error.hpp"
#include "netreduce/graph.hpp"
#include "netreduce/numerics.hpp"
#include "netreduce/reduction.hpp"
#include "netreduce/dynamics.hpp"
#include "netreduce/integrate.hpp"
#include "netreduce/netgen.hpp"
#include "netreduce/experiments.hpp"
#include "netreduce/io.hpp"
