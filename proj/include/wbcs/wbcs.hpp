#ifndef WBCS_WBCS_HPP
#define WBCS_WBCS_HPP

#include "wbcs/block_model.hpp"
#include "wbcs/config.hpp"
#include "wbcs/csv.hpp"
#include "wbcs/ensembles.hpp"
#include "wbcs/harness.hpp"
#include "wbcs/linalg.hpp"
#include "wbcs/random.hpp"
#include "wbcs/solver.hpp"
#include "wbcs/theory.hpp"
#include "wbcs/theory_sweep.hpp"

#endif  // WBCS_WBCS_HPP
