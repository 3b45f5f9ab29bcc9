#pragma once

#include "susycs/analysis.hpp"
#include "susycs/error.hpp"
#include "susycs/fock.hpp"
#include "susycs/kmatrix.hpp"
#include "susycs/observables.hpp"
#include "susycs/states.hpp"
