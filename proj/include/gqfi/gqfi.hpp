#pragma once

#include "gqfi/symplectic.hpp"
#include "gqfi/states.hpp"
#include "gqfi/qfi.hpp"
#include "gqfi/correlation.hpp"
#include "gqfi/metrology.hpp"
#include "gqfi/sweeps.hpp"
