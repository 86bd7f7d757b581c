#pragma once

#include <wigner/eigensolver.hpp>
#include <wigner/ensemble.hpp>
#include <wigner/errors.hpp>
#include <wigner/identity_suite.hpp>
#include <wigner/resolvent.hpp>
#include <wigner/rng.hpp>
#include <wigner/semicircle.hpp>
#include <wigner/statistics.hpp>
#include <wigner/tracywidom.hpp>
#include <wigner/version.hpp>
