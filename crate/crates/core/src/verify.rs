// TODO: module under construction
