#pragma once

#include <wigner/experiments/config.hpp>
#include <wigner/experiments/figures.hpp>
#include <wigner/experiments/histogram.hpp>
#include <wigner/experiments/io.hpp>
#include <wigner/experiments/parallel.hpp>
#include <wigner/experiments/run.hpp>
#include <wigner/experiments/seed.hpp>
#include <wigner/experiments/svg.hpp>
