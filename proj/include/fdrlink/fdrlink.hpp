#pragma once

#include "fdrlink/adversaries.hpp"
#include "fdrlink/bounds.hpp"
#include "fdrlink/dependence.hpp"
#include "fdrlink/mc.hpp"
#include "fdrlink/normal.hpp"
#include "fdrlink/numeric.hpp"
#include "fdrlink/testing.hpp"
