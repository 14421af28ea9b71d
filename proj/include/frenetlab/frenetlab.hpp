#pragma once

#include "frenetlab/errors.hpp"
#include "frenetlab/numerics.hpp"
#include "frenetlab/curve.hpp"
#include "frenetlab/indicatrix.hpp"
#include "frenetlab/direction.hpp"
#include "frenetlab/classify.hpp"
#include "frenetlab/catalog.hpp"
#include "frenetlab/expression.hpp"
