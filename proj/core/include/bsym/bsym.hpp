#pragma once

#include "bsym/errors.hpp"
#include "bsym/geometry.hpp"
#include "bsym/hamiltonians.hpp"
#include "bsym/integrate.hpp"
#include "bsym/io.hpp"
#include "bsym/liftcheck.hpp"
#include "bsym/oracles.hpp"
#include "bsym/orbits.hpp"
#include "bsym/timescale.hpp"
#include "bsym/version.hpp"
