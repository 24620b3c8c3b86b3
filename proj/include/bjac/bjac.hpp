#pragma once

#include "bjac/annihilator.hpp"
#include "bjac/blocksolve.hpp"
#include "bjac/errors.hpp"
#include "bjac/harness/benchmark.hpp"
#include "bjac/harness/double_double.hpp"
#include "bjac/harness/generators.hpp"
#include "bjac/harness/oracle.hpp"
#include "bjac/matcore.hpp"
#include "bjac/matrix.hpp"
#include "bjac/matrix_io.hpp"
#include "bjac/pivot.hpp"
#include "bjac/random.hpp"
#include "bjac/rotations.hpp"
#include "bjac/ubc.hpp"
