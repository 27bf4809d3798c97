#pragma once

#include "berryspin/adiabatic.hpp"
#include "berryspin/berry.hpp"
#include "berryspin/errors.hpp"
#include "berryspin/linalg.hpp"
#include "berryspin/spin_model.hpp"
#include "berryspin/sweep.hpp"
