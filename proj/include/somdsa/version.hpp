#pragma once

#define SOMDSA_VERSION "0.1.0"
