#pragma once

// Umbrella header: the whole library except the command-line front end.

#include "difflab/version.hpp"

#include "difflab/core/config.hpp"
#include "difflab/core/errors.hpp"
#include "difflab/core/random.hpp"
#include "difflab/core/verdict.hpp"

#include "difflab/expr/expression.hpp"
#include "difflab/expr/parser.hpp"

#include "difflab/jet/directional.hpp"
#include "difflab/jet/divided_difference.hpp"
#include "difflab/jet/fd.hpp"
#include "difflab/jet/smoothness.hpp"
#include "difflab/jet/taylor.hpp"

#include "difflab/diffeology/functors.hpp"
#include "difflab/diffeology/model_space.hpp"
#include "difflab/diffeology/morphism.hpp"
#include "difflab/diffeology/probes.hpp"
#include "difflab/diffeology/reparam.hpp"

#include "difflab/tangent/alpha.hpp"
#include "difflab/tangent/classes.hpp"
#include "difflab/tangent/jet_vector.hpp"
#include "difflab/tangent/structure.hpp"

#include "difflab/convenient/dual_pair.hpp"
#include "difflab/convenient/lipk.hpp"
#include "difflab/convenient/mackey.hpp"
#include "difflab/convenient/weak.hpp"

#include "difflab/gallery/gallery.hpp"

#include "difflab/io/loaders.hpp"
#include "difflab/io/report.hpp"
#include "difflab/io/schema.hpp"
