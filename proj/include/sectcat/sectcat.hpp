#pragma once

// Umbrella header: everything except the command-line layer.

#include "sectcat/sparse_vector.hpp"
#include "sectcat/linalg.hpp"
#include "sectcat/graded.hpp"
#include "sectcat/model.hpp"
#include "sectcat/model_parser.hpp"
#include "sectcat/cdga.hpp"
#include "sectcat/cohomology.hpp"
#include "sectcat/dg_module.hpp"
#include "sectcat/poincare.hpp"
#include "sectcat/retraction.hpp"
#include "sectcat/invariants.hpp"
