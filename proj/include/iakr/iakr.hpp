#pragma once

// Umbrella header: the whole library.

#include "iakr/constraint.hpp"
#include "iakr/core.hpp"
#include "iakr/countermodel.hpp"
#include "iakr/csv.hpp"
#include "iakr/decision.hpp"
#include "iakr/derivation.hpp"
#include "iakr/json_io.hpp"
#include "iakr/parser.hpp"
#include "iakr/relation.hpp"
#include "iakr/semantics.hpp"
#include "iakr/separation.hpp"
