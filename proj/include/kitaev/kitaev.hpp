#pragma once

#include "correlations.hpp"
#include "eigenstate.hpp"
#include "errors.hpp"
#include "folding.hpp"
#include "mixed_canonical.hpp"
#include "observables.hpp"
#include "params.hpp"
#include "quadratic_fermions.hpp"
#include "tensor_chain.hpp"
