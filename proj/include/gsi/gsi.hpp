#pragma once

#include "gsi/catalog.hpp"
#include "gsi/engine.hpp"
#include "gsi/models.hpp"
#include "gsi/rng.hpp"
#include "gsi/serialize.hpp"
#include "gsi/spec.hpp"
#include "gsi/subset.hpp"
#include "gsi/tables.hpp"
#include "gsi/verify.hpp"
