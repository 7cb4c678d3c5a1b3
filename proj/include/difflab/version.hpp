#pragma once

#define DIFFLAB_VERSION "0.1.0"
