#include <math.h>
#include <stdio.h>
#include <string.h>

#include "csg.h"

static const char *DOC =
    "{\"k\":3,\"points\":["
    "{\"x\":0,\"y\":0,\"colors\":[1,2,3]},"
    "{\"x\":1,\"y\":0,\"colors\":[1]},"
    "{\"x\":0,\"y\":1,\"colors\":[2]},"
    "{\"x\":-1,\"y\":0,\"colors\":[3]}]}";

int main(void) {
    csg_instance *inst = NULL;
    if (csg_instance_from_json(DOC, &inst) != CSG_STATUS_OK) {
        fprintf(stderr, "load: %s\n", csg_last_error());
        return 1;
    }
    if (csg_instance_point_count(inst) != 4) return 2;

    csg_solution *sol = NULL;
    if (csg_solve(inst, CSG_MODE_ORACLE, &sol) != CSG_STATUS_OK) {
        fprintf(stderr, "solve: %s\n", csg_last_error());
        return 3;
    }
    if (fabs(csg_solution_cost(sol) - 3.0) > 1e-9) return 4;

    size_t m = csg_solution_edge_count(sol);
    size_t pairs[16];
    if (m > 8 || csg_solution_edges(sol, pairs, 16) != CSG_STATUS_OK) return 5;
    if (csg_is_csg(inst, pairs, m) != 1) return 6;
    if (csg_is_csg(inst, pairs, m - 1) != 0) return 7;

    char *json = csg_solution_to_json(sol);
    if (json == NULL || strstr(json, "oracle") == NULL) return 8;
    csg_string_free(json);

    csg_solution *none = NULL;
    if (csg_solve(inst, CSG_MODE_EXACT2, &none) != CSG_STATUS_NOT_APPLICABLE || none != NULL) return 9;
    if (strlen(csg_last_error()) == 0) return 10;

    csg_solution_free(sol);
    csg_instance_free(inst);
    printf("ok\n");
    return 0;
}
