// Runs every example so they stay working.

macro_rules! examples {
    ($($name:ident),* $(,)?) => {
        $(
            #[allow(dead_code)]
            mod $name {
                include!(concat!("../examples/", stringify!($name), ".rs"));
                #[test]
                fn runs() {
                    main();
                }
            }
        )*
    };
}

examples!(
    fixed_threshold,
    hard_instance,
    instance_files,
    lp_solver,
    matching_prices,
    matroid_prices,
    offline_optimum,
    single_item_dynamic,
    survival_curve,
    xos_configuration_lp,
);
