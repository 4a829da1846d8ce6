#include <math.h>
#include <stdio.h>
#include <string.h>

#include "statorforge.h"

#define CHECK(cond)                                                  \
    do {                                                             \
        if (!(cond)) {                                               \
            fprintf(stderr, "check failed at line %d: %s\n", __LINE__, #cond); \
            return 1;                                                \
        }                                                            \
    } while (0)

int main(void) {
    const double sx[4] = {0.0, 1.0, 1.0, 0.0};
    SfMatrix *theta = NULL;
    CHECK(sf_matrix_new(2, 2, sx, NULL, &theta) == SF_STATUS_OK);

    SfStator *s = NULL;
    SfMatrix *theta_b = NULL;
    CHECK(sf_stator_construct(theta, NULL, NULL, &s, &theta_b) == SF_STATUS_OK);
    CHECK(sf_stator_dim_b(s) == 2);

    double r = 1.0;
    CHECK(sf_stator_eigenop_residual(s, theta, theta_b, &r) == SF_STATUS_OK);
    CHECK(r < 1e-12);

    SfMatrix *u = NULL;
    CHECK(sf_stator_dilate(s, 0, &u) == SF_STATUS_OK);
    CHECK(sf_matrix_rows(u) == 4);

    const double psi[2] = {1.0, 0.0};
    double out_re[2], out_im[2], leak = 1.0;
    CHECK(sf_effective_evolve(u, theta_b, 0.7, psi, NULL, 2, out_re, out_im, &leak) == SF_STATUS_OK);
    /* e^{-i σ_x t}|0> = (cos t, -i sin t) */
    CHECK(fabs(out_re[0] - cos(0.7)) < 1e-12 && fabs(out_im[1] + sin(0.7)) < 1e-12);
    CHECK(fabs(leak) < 1e-12);

    const double nil[4] = {0.0, 1.0, 0.0, 0.0};
    SfMatrix *bad = NULL;
    SfStator *none = NULL;
    SfMatrix *none_b = NULL;
    CHECK(sf_matrix_new(2, 2, nil, NULL, &bad) == SF_STATUS_OK);
    CHECK(sf_stator_construct(bad, NULL, NULL, &none, &none_b) == SF_STATUS_NOT_NORMAL);
    CHECK(strstr(sf_last_error_message(), "NotNormal") != NULL);

    double dev = 1.0;
    bool pass = false;
    CHECK(sf_plaquette_demo(9, 1.0, 0.5, 1e-10, &dev, &leak, &pass) == SF_STATUS_TOO_LARGE);
    CHECK(sf_plaquette_demo(4, 1.0, 0.5, 1e-10, &dev, &leak, &pass) == SF_STATUS_OK && pass);

    char *json = NULL;
    CHECK(sf_stator_to_json(s, &json) == SF_STATUS_OK);
    CHECK(strstr(json, "\"kraus\"") != NULL);
    sf_string_free(json);

    sf_matrix_free(bad);
    sf_matrix_free(u);
    sf_matrix_free(theta_b);
    sf_matrix_free(theta);
    sf_stator_free(s);
    printf("ok\n");
    return 0;
}
