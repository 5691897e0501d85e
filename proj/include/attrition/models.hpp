#pragma once

// Feature selection, classification, balancing and evaluation.

#include "attrition/dataset.hpp"
#include "attrition/evaluation.hpp"
#include "attrition/linear.hpp"
#include "attrition/tree.hpp"
