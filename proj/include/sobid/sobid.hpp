#pragma once

#include "sobid/basis.hpp"
#include "sobid/bounds.hpp"
#include "sobid/dataset.hpp"
#include "sobid/generators.hpp"
#include "sobid/gradest.hpp"
#include "sobid/identify.hpp"
#include "sobid/predict.hpp"
#include "sobid/rng.hpp"
#include "sobid/runner.hpp"
#include "sobid/sobolev.hpp"
#include "sobid/solver.hpp"
#include "sobid/types.hpp"
