# sktpol utilities package
