#pragma once

#include "phibose/lattice.hpp"
#include "phibose/harmonics.hpp"
#include "phibose/phi_operator.hpp"
#include "phibose/continuum.hpp"
#include "phibose/verification.hpp"
#include "phibose/wick.hpp"
#include "phibose/experiments.hpp"
