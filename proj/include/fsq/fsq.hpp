#pragma once

#include "fsq/complex_matrix.hpp"
#include "fsq/export.hpp"
#include "fsq/finite_section.hpp"
#include "fsq/inductive_limit.hpp"
#include "fsq/linalg.hpp"
#include "fsq/model_io.hpp"
#include "fsq/operator_model.hpp"
#include "fsq/ozawa.hpp"
#include "fsq/parallel.hpp"
#include "fsq/rng.hpp"
#include "fsq/sanov.hpp"
#include "fsq/tolerances.hpp"
#include "fsq/ucp.hpp"
#include "fsq/verify.hpp"
#include "fsq/version.hpp"
