def composed_cells(arity, gadget):
    """
    Cells of M_{f o g} for an arity-n outer function.

    Args:
        arity (int): n
        gadget (GadgetMatrix): g

    Returns:
        int: |X|^n * |Y|^n
    """
    return (gadget.rows ** arity) * (gadget.cols ** arity)


def can_run_instance(instance, budget_cells):
    """
    Check if an instance fits the desk-scale budget.

    Args:
        instance (Instance): Suite instance
        budget_cells (int): Largest matrix the run may materialize

    Returns:
        tuple: (True, '') or (False, reason)
    """
    if instance.gadget is None:
        return True, ''
    arity = instance.function.arity if instance.function is not None else instance.params.get('power', 1)
    cells = composed_cells(arity, instance.gadget)
    if cells > budget_cells:
        return False, f"{cells} composed cells over the budget of {budget_cells}"
    return True, ''
