#pragma once

#include "fpinc/applications.hpp"
#include "fpinc/bounds.hpp"
#include "fpinc/curves.hpp"
#include "fpinc/duality.hpp"
#include "fpinc/errors.hpp"
#include "fpinc/field.hpp"
#include "fpinc/harness.hpp"
#include "fpinc/incidence.hpp"
#include "fpinc/invariants.hpp"
#include "fpinc/projective.hpp"
